#pragma once

#include "seqtag/model.hpp"

#include <string>

namespace seqtag {

// Versioned binary container: magic, version, then length-prefixed named
// sections (meta text, tagset, vocabularies, tensors as little-endian
// doubles with shape headers). Save -> load -> save is byte-identical.
void save_checkpoint(const std::string& path, Model& model, const std::string& config_text);

struct LoadedCheckpoint {
    Model model;
    std::string config_text;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

} // namespace seqtag
