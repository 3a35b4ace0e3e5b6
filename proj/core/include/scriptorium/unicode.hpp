// core/include/scriptorium/unicode.hpp

// Copyright 2024-2026  The scriptorium authors

// See LICENSE at the top of the source tree.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

// Thin UTF-8 helpers over ICU. All strings in the library are UTF-8.
namespace scriptorium::unicode {

std::string nfc(std::string_view text);
std::string nfd(std::string_view text);

// Splits into code points, each returned as its own UTF-8 string.
// Invalid sequences are replaced by U+FFFD.
std::vector<std::string> code_points(std::string_view text);
std::u32string to_u32(std::string_view text);
std::string to_utf8(std::u32string_view text);
std::string to_utf8(char32_t cp);

std::size_t length(std::string_view text);  // in code points

bool is_combining_mark(char32_t cp);
bool is_space(char32_t cp);
bool is_punctuation(char32_t cp);
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

// First code point of a UTF-8 string, U+FFFD when empty or invalid.
char32_t first_code_point(std::string_view text);

}  // namespace scriptorium::unicode
