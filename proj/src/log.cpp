// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hoist/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace hoist {

bool log_enabled() {
    static const bool enabled = [] {
        const char* value = std::getenv("HOIST_LOG");
        return value != nullptr && *value != '\0' && std::strcmp(value, "0") != 0;
    }();
    return enabled;
}

void log_info(const std::string& message) {
    if (log_enabled()) std::fprintf(stderr, "[hoist] %s\n", message.c_str());
}

}  // namespace hoist
