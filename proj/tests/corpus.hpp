// Shared test corpus.
#pragma once

#include <string>
#include <vector>

namespace test {

inline const std::vector<std::string>& corpus() {
  static const std::vector<std::string> c = {
      "ball:r=0.5",      "ball:r=1",          "ball:r=2",
      "ellipsoid:1,1,2", "ellipsoid:1,1,1.5", "ellipsoid:1.5,1.5,1",
      "superellipsoid:1,1,1;e=4", "roundedbox:1,1,1;r=0.3"};
  return c;
}

inline bool is_ball(const std::string& d) { return d.rfind("ball:", 0) == 0; }

}  // namespace test
