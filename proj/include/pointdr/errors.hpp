#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pointdr {

// Malformed input file (truncated record, bad header, unparseable line).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite value produced inside the model; layer_index counts linear
// layers in forward order across encoder, projector, classifier.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t layer_index)
      : std::runtime_error(what), layer_index_(layer_index) {}
  std::size_t layer_index() const { return layer_index_; }

 private:
  std::size_t layer_index_;
};

}  // namespace pointdr
