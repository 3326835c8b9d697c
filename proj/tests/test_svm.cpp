#include <catch2/catch_amalgamated.hpp>

#include "rudetect/svm.hpp"
#include "support/oracles.hpp"

TEST_CASE("placeholder svm") { REQUIRE(true); }
