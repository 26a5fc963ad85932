// SPDX-License-Identifier: Apache-2.0
#ifndef LQW_VERSION_HPP
#define LQW_VERSION_HPP

namespace lqw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lqw

#endif  // LQW_VERSION_HPP
