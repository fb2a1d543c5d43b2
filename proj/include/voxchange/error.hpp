// SPDX-FileCopyrightText: 2026 The voxchange authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCHANGE_ERROR_HPP
#define VOXCHANGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace voxchange {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Normal equations of an adjustment are singular (gauge freedom or
/// insufficient observations).
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// Registration had too few usable correspondences.
class DegenerateCorrespondence : public Error {
 public:
  using Error::Error;
};

}  // namespace voxchange

#endif  // VOXCHANGE_ERROR_HPP
