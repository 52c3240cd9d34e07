#include "mrc/types.hpp"

#include <string>

#include "mrc/error.hpp"

namespace mrc {

const char* to_string(Variant v) { return v == Variant::mrc ? "mrc" : "cmrc"; }
const char* to_string(Loss l) { return l == Loss::zero_one ? "0-1" : "log"; }

Variant parse_variant(const std::string& s) {
  if (s == "mrc") return Variant::mrc;
  if (s == "cmrc") return Variant::cmrc;
  throw UsageError("unknown variant '" + s + "' (expected mrc or cmrc)");
}

Loss parse_loss(const std::string& s) {
  if (s == "0-1" || s == "zero-one") return Loss::zero_one;
  if (s == "log") return Loss::log;
  throw UsageError("unknown loss '" + s + "' (expected 0-1 or log)");
}

}  // namespace mrc
