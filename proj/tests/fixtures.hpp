#pragma once

#include "fan.hpp"

#include <string>

#ifndef TORICOUNT_DATA_DIR
#define TORICOUNT_DATA_DIR "data"
#endif

inline std::string data_path(const std::string& rel) { return std::string(TORICOUNT_DATA_DIR) + "/" + rel; }

inline toric::ToricFan test_fan(const std::string& name) { return toric::load_fan_file(data_path("fans/" + name + ".json")); }
