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

#include "qndsim/input_state.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "qndsim/error.h"

namespace qnd {

namespace {

double parse_number(std::string_view text, std::string_view whole) {
    double value = 0.0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw Error(ErrorKind::InvalidArgument, "invalid input state descriptor '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

InputState InputState::parse(std::string_view text) {
    if (text == "vacuum") {
        return vacuum();
    }
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorKind::InvalidArgument, "invalid input state descriptor '" + std::string(text) + "'");
    }
    const auto name = text.substr(0, colon);
    const auto args = text.substr(colon + 1);
    if (name == "coherent") {
        const auto comma = args.find(',');
        if (comma == std::string_view::npos) {
            return coherent(parse_number(args, text));
        }
        return coherent({parse_number(args.substr(0, comma), text), parse_number(args.substr(comma + 1), text)});
    }
    if (name == "squeezed") {
        return squeezed(parse_number(args, text));
    }
    throw Error(ErrorKind::InvalidArgument, "invalid input state descriptor '" + std::string(text) + "'");
}

std::string InputState::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::Vacuum:
            return "vacuum";
        case Kind::Coherent:
            os << "coherent:" << alpha.real();
            if (alpha.imag() != 0.0) {
                os << ',' << alpha.imag();
            }
            return os.str();
        case Kind::Squeezed:
            os << "squeezed:" << r;
            return os.str();
    }
    return "vacuum";
}

FockVector InputState::fock(std::size_t dim) const {
    switch (kind) {
        case Kind::Coherent:
            return coherent_state(alpha, dim);
        case Kind::Squeezed:
            return squeezed_vacuum(r, dim);
        case Kind::Vacuum:
            break;
    }
    return FockVector::vacuum(dim);
}

GaussianWigner InputState::wigner() const {
    switch (kind) {
        case Kind::Coherent:
            return {alpha.real(), alpha.imag(), 0.25, 0.25};
        case Kind::Squeezed:
            return {0.0, 0.0, 0.25 * std::exp(-2.0 * r), 0.25 * std::exp(2.0 * r)};
        case Kind::Vacuum:
            break;
    }
    return GaussianWigner::vacuum();
}

}  // namespace qnd
