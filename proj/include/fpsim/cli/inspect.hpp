#pragma once

#include <string>

#include "fpsim/core/types.hpp"

namespace fpsim::cli {

// Renders a human-readable report of a bus capture: per-direction record
// counts, FDA command offsets on MOSI, glitch markers, and a decode verdict
// for every sample reassembled from the master-side frames.
std::string inspect_capture(const std::string& path,
                            const core::DeviceProfile& profile);

}  // namespace fpsim::cli
