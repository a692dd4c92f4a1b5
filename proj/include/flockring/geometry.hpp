#pragma once

#include <Eigen/Core>

namespace flockring {

using Vec2 = Eigen::Vector2d;

} // namespace flockring
