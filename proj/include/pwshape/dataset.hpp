#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pwshape/geometry.hpp"

namespace pwshape {

/// Specimens by group label; every specimen has the same N and K.
struct Dataset {
  std::map<std::string, std::vector<LandmarkConfig>> groups;
  int N = 0;
  int K = 0;

  const std::vector<LandmarkConfig>& group(const std::string& label) const;
  std::size_t size() const;
};

/// Tab-separated lines `group  specimen  landmark_index  x  y [z]`. Lines that
/// are blank or start with '#' are skipped. Landmarks are sorted by index; the
/// specimen order within a group follows first appearance.
Dataset read_landmarks(const std::string& path);
Dataset read_landmarks(std::istream& in);

/// Writes the same format with 17 significant digits.
void write_landmarks(const Dataset& data, const std::string& path);
void write_landmarks(const Dataset& data, std::ostream& out);

}  // namespace pwshape
