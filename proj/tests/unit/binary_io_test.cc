// tests/unit/binary_io_test.cc

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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "test_support.h"

namespace scriptorium {
namespace {

TEST(BinaryIoTest, RoundTripsEveryFieldType) {
  BinaryWriter w;
  w.magic("SCRX");
  w.u32(0xDEADBEEF);
  w.u64(1ull << 40);
  w.i64(-5);
  w.f32(1.5f);
  w.f64(-0.1);
  w.str("avẹr");
  const std::vector<float> v{0.f, -1.f, std::numeric_limits<float>::infinity()};
  w.floats(v.data(), v.size());
  BinaryReader r(w.bytes());
  r.expect_magic("SCRX");
  EXPECT_EQ(r.u32(), 0xDEADBEEFu);
  EXPECT_EQ(r.u64(), 1ull << 40);
  EXPECT_EQ(r.i64(), -5);
  EXPECT_EQ(r.f32(), 1.5f);
  EXPECT_EQ(r.f64(), -0.1);
  EXPECT_EQ(r.str(), "avẹr");
  EXPECT_EQ(r.floats(), v);
  EXPECT_TRUE(r.at_end());
}

TEST(BinaryIoTest, LittleEndianLayout) {
  BinaryWriter w;
  w.u32(0x01020304);
  EXPECT_EQ(w.bytes(), std::string("\x04\x03\x02\x01", 4));
}

TEST(BinaryIoTest, TruncationAndWrongMagic) {
  BinaryWriter w;
  w.magic("SCRX");
  w.str("hello");
  for (std::size_t n = 0; n < w.bytes().size(); ++n) {
    BinaryReader r(w.bytes().substr(0, n));
    EXPECT_THROW({
      r.expect_magic("SCRX");
      r.str();
    }, ParseError) << n;
  }
  BinaryReader bad(w.bytes());
  EXPECT_THROW(bad.expect_magic("NOPE"), ParseError);
}

TEST(BinaryIoTest, FilesRoundTrip) {
  testing::TempDir dir("bin");
  BinaryWriter w;
  w.u64(42);
  w.save(dir / "sub/x.bin");
  EXPECT_EQ(BinaryReader::load(dir / "sub/x.bin").u64(), 42u);
  write_file(dir / "t.txt", std::string("a\0b", 3));
  EXPECT_EQ(read_file(dir / "t.txt").size(), 3u);
  EXPECT_THROW(read_file(dir / "missing"), Error);
}

}  // namespace
}  // namespace scriptorium
