#pragma once

#include <filesystem>
#include <iosfwd>

#include "mrc/classifier.hpp"

namespace mrc {

inline constexpr int kModelFormatVersion = 1;

/// Model files (".mrc") are UTF-8 text, one `key = value` pair per line in
/// a fixed key order, terminated by a line `end`. Reals are written as a
/// hexadecimal float literal followed by `; <decimal>` for readers; only the
/// hexadecimal part is parsed back, so round trips are exact. docs/model-format.md
/// lists every key.
void save_model(const MRCModel& model, std::ostream& out);
void save_model(const MRCModel& model, const std::filesystem::path& path);

/// Throws DataError with distinct messages for IO failure ("cannot open"),
/// an unknown format version ("unsupported model format_version") and
/// malformed or truncated content ("corrupt model file"). The loaded model
/// is validated before it is returned.
MRCModel load_model(std::istream& in);
MRCModel load_model(const std::filesystem::path& path);

}  // namespace mrc
