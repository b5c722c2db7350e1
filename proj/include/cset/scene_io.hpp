#pragma once

#include <string>

#include "cset/scene.hpp"

namespace cset {

// Strict scene loading: unknown keys anywhere in the document are rejected
// (ValidationError naming the key), all reals must be finite decimals.
Scene load_scene_from_string(const std::string& json_text);
Scene load_scene_file(const std::string& path);

}  // namespace cset
