#include <catch2/catch_amalgamated.hpp>

#include "rudetect/evaluation.hpp"
#include "rudetect/smoothing.hpp"

TEST_CASE("placeholder smooth") { REQUIRE(true); }
