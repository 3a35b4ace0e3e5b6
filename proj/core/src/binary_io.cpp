// core/src/binary_io.cpp

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

#include "scriptorium/binary_io.hpp"

#include <fstream>
#include <sstream>

namespace scriptorium {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write to a sibling temp file and rename so readers never see a torn file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void BinaryWriter::save(const std::filesystem::path& path) const {
  write_file(path, bytes_);
}

BinaryReader BinaryReader::load(const std::filesystem::path& path) {
  return BinaryReader(read_file(path));
}

void BinaryReader::expect_magic(std::string_view tag) {
  need(tag.size());
  if (std::string_view(bytes_).substr(pos_, tag.size()) != tag) {
    throw ParseError("bad magic, expected '" + std::string(tag) + "'");
  }
  pos_ += tag.size();
}

std::string BinaryReader::str() {
  const auto n = u32();
  need(n);
  std::string s = bytes_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::vector<float> BinaryReader::floats() {
  const auto n = u64();
  need(n * 4);
  std::vector<float> out(n);
  for (auto& v : out) v = f32();
  return out;
}

}  // namespace scriptorium
