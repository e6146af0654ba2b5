#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dialnorm::sem {

/// Labelled 2-D scatter; points are coloured by group (kNoise in grey).
std::string scatter_svg(const Eigen::Matrix<double, Eigen::Dynamic, 2>& points, const std::vector<std::string>& names,
                        const std::vector<int>& groups, const std::string& title);

/// Polyline of y over x with point markers.
std::string line_svg(const std::vector<double>& x, const std::vector<double>& y, const std::string& x_label,
                     const std::string& y_label);

}  // namespace dialnorm::sem
