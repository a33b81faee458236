#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ctgof/scalar_model.hpp"

namespace ctgof {

// Builds a ScalarModel from "name:key=value,key=value". Names:
//   constant:value          linear:a,b            poly:c0,c1,...
//   ou:theta,mean           sinusoidal:base,amp,period
//   exp-kernel:a,b,support  box-kernel:height,width   box-h:height,width
//   cosine-h:c,freq,shift   table:file   (CSV x,y; relative to base_dir)
// Missing keys take documented defaults; unknown names or keys throw
// std::invalid_argument.
ScalarModel parse_model(std::string_view spec, const std::filesystem::path& base_dir = {});

// One line per model name with its keys and defaults.
std::string model_vocabulary_help();

}  // namespace ctgof
