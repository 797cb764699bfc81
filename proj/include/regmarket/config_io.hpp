// Copyright 2026 The regmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON scenario files. Keys mirror the MarketConfig field names; any key not
// listed there is rejected.

#ifndef REGMARKET_CONFIG_IO_HPP_
#define REGMARKET_CONFIG_IO_HPP_

#include <string>

#include "json.hpp"
#include "regmarket/market_model.hpp"

namespace regmarket {

nlohmann::ordered_json config_to_json(const MarketConfig& cfg);

// Missing keys keep their defaults. Does not validate.
MarketConfig config_from_json(const nlohmann::json& doc);

std::string serialize_config(const MarketConfig& cfg);
MarketConfig parse_config(const std::string& text);

// Parses and validates; throws ConfigError on any problem.
MarketConfig load_config(const std::string& path);
void save_config(const MarketConfig& cfg, const std::string& path);

}  // namespace regmarket

#endif  // REGMARKET_CONFIG_IO_HPP_
