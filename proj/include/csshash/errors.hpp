// Copyright 2026 The csshash Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csshash {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
   public:
    using Error::Error;
};

/// An input exceeds one of the desk-scale enumeration guards.
class TooLarge : public Error {
   public:
    using Error::Error;
};

class BadDimensions : public Error {
   public:
    using Error::Error;
};

class NotFullRank : public Error {
   public:
    using Error::Error;
};

class NotCommuting : public Error {
   public:
    using Error::Error;
};

class NotCss : public Error {
   public:
    using Error::Error;
};

class NotFullyEntangled : public Error {
   public:
    using Error::Error;
};

class BadPartition : public Error {
   public:
    using Error::Error;
};

class NotPermutation : public Error {
   public:
    using Error::Error;
};

class NotSymplectic : public Error {
   public:
    using Error::Error;
};

class Infeasible : public Error {
   public:
    using Error::Error;
};

class BadSchedule : public Error {
   public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 means "end of input".
class ParseError : public Error {
   public:
    ParseError(std::size_t line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {
    }
    std::size_t line() const {
        return line_;
    }

   private:
    std::size_t line_;
};

}  // namespace csshash
