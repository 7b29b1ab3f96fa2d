/**********
 *   Copyright 2026 The polarsep Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#ifndef POLARSEP_ERRORS_HPP
#define POLARSEP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polarsep {

/// Invalid argument or violated precondition (bad angles, bad K, bad config).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Images, arrays or operators whose dimensions do not agree.
class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A numerical procedure could not produce a meaningful answer
/// (rank-deficient system, unidentifiable parameter).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File access and file format failures. The kind distinguishes the
/// header, dimension and payload failure modes of the image readers.
class IoError : public std::runtime_error {
public:
    enum class Kind { Open, Write, MalformedHeader, DimensionOverflow, TruncatedPayload, Unsupported };

    IoError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace polarsep

#endif
