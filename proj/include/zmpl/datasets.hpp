#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zmpl/distributions.hpp"
#include "zmpl/inference.hpp"

namespace zmpl {

struct Dataset {
  std::string name;
  CountSample sample;
  // Last-cell layout the data were published with, if known. The embedded
  // tables use the open layout of their source.
  std::optional<TailCell> preferred_tail;
};

/// `builtin:<tag>` resolves to an embedded table; anything else is a path.
Dataset parse_dataset(const std::string& spec);

/// Auto-detects a frequency table ("value,frequency" or "value frequency"
/// per line) or raw counts (one per line). '#' starts a comment; an optional
/// non-numeric first line is a header.
Dataset parse_dataset_text(const std::string& text, const std::string& name);

std::vector<std::string> builtin_dataset_names();

}  // namespace zmpl
