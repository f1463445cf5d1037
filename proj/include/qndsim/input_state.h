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

#ifndef QNDSIM_INPUT_STATE_H
#define QNDSIM_INPUT_STATE_H

#include <complex>
#include <string>
#include <string_view>

#include "qndsim/fock.h"
#include "qndsim/wigner.h"

namespace qnd {

/// Signal input family: vacuum, coherent(alpha) or squeezed vacuum(r).
struct InputState {
    enum class Kind { Vacuum, Coherent, Squeezed };

    Kind kind = Kind::Vacuum;
    cplx alpha{};
    double r = 0.0;

    static InputState vacuum() {
        return {};
    }
    static InputState coherent(cplx a) {
        return {Kind::Coherent, a, 0.0};
    }
    static InputState squeezed(double squeeze) {
        return {Kind::Squeezed, {}, squeeze};
    }

    /// Accepts "vacuum", "coherent:RE", "coherent:RE,IM" and "squeezed:R".
    static InputState parse(std::string_view text);
    std::string describe() const;

    FockVector fock(std::size_t dim) const;
    GaussianWigner wigner() const;
};

}  // namespace qnd

#endif
