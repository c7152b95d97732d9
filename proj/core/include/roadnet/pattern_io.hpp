#ifndef ROADNET_PATTERN_IO_HPP
#define ROADNET_PATTERN_IO_HPP

#include <string>

#include "roadnet/pattern.hpp"

namespace roadnet {

// Pattern files are JSON documents with top-level keys "name" and "arcs";
// each arc carries "type" in {"segment","circle","arc","polyline"} plus the
// fields of the corresponding ArcSpec. Unknown keys are rejected. See
// fixtures/README.md for the full schema.
TorusPattern parse_pattern(const std::string& text);
TorusPattern load_pattern(const std::string& path);

std::string pattern_to_json(const TorusPattern& pattern);

}  // namespace roadnet

#endif
