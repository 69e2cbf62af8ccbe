#pragma once

#include <string>
#include <vector>

#include "fpsim/core/types.hpp"

namespace fpsim::core {

// Parses a device catalog. Unknown fields, missing fields, type mismatches
// and invariant violations all raise ParseError/InvariantViolation naming the
// offending profile and field.
std::vector<DeviceProfile> parse_catalog(const std::string& json_text);

std::vector<DeviceProfile> load_profiles(const std::string& path);

std::string serialize_catalog(const std::vector<DeviceProfile>& profiles);

// The catalog shipped under fixtures/, resolved at build time.
std::vector<DeviceProfile> load_fixture_catalog();

const DeviceProfile& find_profile(const std::vector<DeviceProfile>& catalog,
                                  const std::string& name);

void validate_profile(const DeviceProfile& p);

}  // namespace fpsim::core
