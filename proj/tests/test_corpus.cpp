#include <catch2/catch_amalgamated.hpp>

#include "rudetect/corpus.hpp"

TEST_CASE("placeholder corpus") { REQUIRE(true); }
