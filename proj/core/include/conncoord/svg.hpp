#pragma once

#include <string>

#include "conncoord/report.hpp"

namespace conncoord {

/// Position (or joint angle) components against time, one polyline per column.
std::string positions_svg(const CsvTable& table, const std::string& title);

/// Initial-edge distances d[i][j] against time with a dashed line at r.
std::string distances_svg(const CsvTable& table, double r, const std::string& title);

}  // namespace conncoord
