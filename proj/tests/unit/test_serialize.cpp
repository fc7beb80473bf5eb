#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>

#include <nlohmann/json.hpp>

#include "glueflow/errors.hpp"
#include "glueflow/serialize.hpp"
#include "support.hpp"

namespace {

using namespace glueflow;
using gft::built;
using gft::Gen;

TEST(HexDouble, BitExactRoundTrip) {
  gft::for_all(20000, 1, [](Gen& g, int i) {
    double v = 0.0;
    if (i % 3 == 0) {
      v = g.uniform(-1e3, 1e3);
    } else {
      // Arbitrary finite bit patterns, subnormals included.
      std::uint64_t bits = g.engine()();
      v = std::bit_cast<double>(bits);
      if (!std::isfinite(v)) return;
    }
    const double back = parse_hex_double(hex_double(v));
    ASSERT_EQ(std::bit_cast<std::uint64_t>(back), std::bit_cast<std::uint64_t>(v)) << hex_double(v);
  });
  for (double v : {0.0, -0.0, std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max(), 1.0}) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(parse_hex_double(hex_double(v))), std::bit_cast<std::uint64_t>(v));
  }
}

TEST(HexDouble, RejectsBadInput) {
  EXPECT_THROW(hex_double(std::numeric_limits<double>::infinity()), FormatError);
  EXPECT_THROW(hex_double(std::nan("")), FormatError);
  EXPECT_THROW(parse_hex_double("1.5"), FormatError);
  EXPECT_THROW(parse_hex_double("0xzz"), FormatError);
}

TEST(SystemJson, RoundTripIsExact) {
  for (int depth : {0, 1, 2}) {
    const DisplayedSystem& d = built().D(depth);
    const std::string text = system_to_json(d);
    const DisplayedSystem back = system_from_json(text);
    EXPECT_EQ(back, d) << "depth " << depth;
    EXPECT_EQ(system_to_json(back), text);
  }
}

TEST(SystemJson, ReloadedSystemFlowsIdentically) {
  const DisplayedSystem& d = built().D(2);
  const DisplayedSystem back = system_from_json(system_to_json(d));
  gft::for_all(20, 2, [&](Gen& g, int) {
    const SpacePoint s{g.uniform(-20, 20), g.fiber(-3, 3)};
    if (!locate(d, s).member) return;
    const FlowResult a = flow(d, s, 15.0);
    const FlowResult b = flow(back, s, 15.0);
    EXPECT_EQ(a.end, b.end);
  });
}

TEST(SystemJson, RejectsMalformedDocuments) {
  EXPECT_THROW(system_from_json("not json"), FormatError);
  EXPECT_THROW(system_from_json(R"({"format":"other","version":1,"levels":[]})"), FormatError);
  EXPECT_THROW(system_from_json(R"({"format":"glueflow-displayed-system","version":99,"levels":[]})"), FormatError);
  auto doc = nlohmann::json::parse(system_to_json(built().D(1)));
  doc["levels"][0].erase("w0");
  EXPECT_THROW(system_from_json(doc.dump()), FormatError);
}

TEST(SystemFile, SaveLoadAndIoErrors) {
  const auto path = std::filesystem::temp_directory_path() / "glueflow-test-system.json";
  save_system(built().D(1), path.string());
  EXPECT_EQ(load_system(path.string()), built().D(1));
  std::filesystem::remove(path);
  EXPECT_THROW(load_system(path.string()), IoError);
  EXPECT_THROW(save_system(built().D(1), "/nonexistent-dir/x/system.json"), IoError);
}

}  // namespace
