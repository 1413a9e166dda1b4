// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace convrec {

/// Invalid network, dataset or run configuration (shape mismatch, bad value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse: calling an operation whose preconditions are not met.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Unknown user, item or attribute.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Training diverged or received non-finite values.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A module invariant was violated internally.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace convrec
