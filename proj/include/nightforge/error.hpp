/*
 * Copyright 2026 The Nightforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nightforge {

enum class Errc {
  kFileNotFound,
  kMalformedPng,
  kMalformedMetadata,
  kIoError,
  kSingularMatrix,
  kInvalidGamma,
  kBadDims,
  kDegenerateImage,
  kInvalidMean,
  kDimMismatch,
  kImageTooSmall,
  kEmptyProfile,
  kInvalidArgument,
  kInvalidConfig,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kFileNotFound: return "FileNotFound";
    case Errc::kMalformedPng: return "MalformedPng";
    case Errc::kMalformedMetadata: return "MalformedMetadata";
    case Errc::kIoError: return "IoError";
    case Errc::kSingularMatrix: return "SingularMatrix";
    case Errc::kInvalidGamma: return "InvalidGamma";
    case Errc::kBadDims: return "BadDims";
    case Errc::kDegenerateImage: return "DegenerateImage";
    case Errc::kInvalidMean: return "InvalidMean";
    case Errc::kDimMismatch: return "DimMismatch";
    case Errc::kImageTooSmall: return "ImageTooSmall";
    case Errc::kEmptyProfile: return "EmptyProfile";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// An Error raised while a named pipeline stage was running.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), "stage '" + stage + "': " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace nightforge
