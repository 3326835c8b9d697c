#include <catch2/catch_amalgamated.hpp>

#include "rudetect/kmeans.hpp"
#include "rudetect/projection.hpp"

TEST_CASE("placeholder segcluster") { REQUIRE(true); }
