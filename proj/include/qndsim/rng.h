// Copyright 2026 The qndsim Authors
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

#ifndef QNDSIM_RNG_H
#define QNDSIM_RNG_H

#include <array>
#include <cstdint>
#include <string_view>

namespace qnd {

/// Philox4x64-10 counter-based generator. Every (key, counter) pair maps to an
/// independent block of four 64-bit words, so trial i of sub-stream j can be
/// generated in any order or on any thread.
class Philox4x64 {
   public:
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static constexpr std::string_view kName = "philox4x64-10";

    static Counter block(Counter counter, Key key);
};

/// Uniform in (0, 1) from the top 52 bits, offset by half a step so neither endpoint is reachable.
inline double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace qnd

#endif
