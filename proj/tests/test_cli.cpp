#include <catch2/catch_amalgamated.hpp>

#include "rudetect/common.hpp"

TEST_CASE("placeholder cli") { REQUIRE(true); }
