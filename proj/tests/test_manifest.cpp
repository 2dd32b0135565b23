#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "advlb/harness/manifest.hpp"

using namespace advlb;

namespace {

DatasetManifest parse(const std::string& text, std::size_t k = 3) {
  std::istringstream in(text);
  return parse_manifest(in, k, "/data", "m.csv");
}

std::string error_of(const std::string& text, std::size_t k = 3) {
  try {
    parse(text, k);
  } catch (const DomainError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Manifest, EmptyFileIsError) {
  EXPECT_NE(error_of("").find("empty manifest"), std::string::npos);
  EXPECT_NE(error_of("path,label\n").find("empty manifest"), std::string::npos);
}

TEST(Manifest, LabelEqualToKIsRangeErrorWithLine) {
  const auto msg = error_of("path,label\na.png,0\nb.png,3\n");
  EXPECT_NE(msg.find("m.csv:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("out of range"), std::string::npos) << msg;
}

TEST(Manifest, ThreeRowsInFileOrder) {
  const auto m = parse("path,label\nc.png,2\na.png,0\nsub/b.png,1\n");
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[0].path, std::filesystem::path("/data/c.png"));
  EXPECT_EQ(m.entries[1].label, 0u);
  EXPECT_EQ(m.entries[2].path, std::filesystem::path("/data/sub/b.png"));
  EXPECT_EQ(m.entries[2].label, 1u);
}

TEST(Manifest, MalformedRows) {
  EXPECT_NE(error_of("path,label\na.png,x\n").find("m.csv:2"), std::string::npos);
  EXPECT_NE(error_of("path,label\na.png,1.5\n").find("not an integer"), std::string::npos);
  EXPECT_NE(error_of("path,label\na.png\n").find("m.csv:2"), std::string::npos);
  EXPECT_NE(error_of("path,label\na.png,-1\n").find("out of range"), std::string::npos);
  EXPECT_NE(error_of("file,class\na.png,1\n").find("header"), std::string::npos);
  EXPECT_NE(error_of("path,label\n\"a.png,1\n").find("unterminated"), std::string::npos);
}

TEST(Manifest, DuplicatePathsRejected) {
  const auto msg = error_of("path,label\na.png,0\n./a.png,1\n");
  EXPECT_NE(msg.find("duplicate"), std::string::npos) << msg;
  EXPECT_NE(msg.find("m.csv:3"), std::string::npos) << msg;
}

TEST(Manifest, QuotesCrlfBomAndExtraColumns) {
  const auto m = parse("\xEF\xBB\xBFpath,label,note\r\n\"a, b.png\",1,hello\r\n\r\n/abs/c.png,2,\"x\"\"y\"\r\n");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].path, std::filesystem::path("/data/a, b.png"));
  EXPECT_EQ(m.entries[0].extra, std::vector<std::string>{"hello"});
  EXPECT_EQ(m.entries[1].path, std::filesystem::path("/abs/c.png"));
  EXPECT_EQ(m.entries[1].extra, std::vector<std::string>{"x\"y"});
}

TEST(Manifest, MissingFileIsError) {
  EXPECT_THROW(load_manifest("/nonexistent/manifest.csv", 2), DomainError);
}

TEST(Manifest, LoadResolvesAgainstManifestDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "advlb_manifest_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "m.csv");
    out << "path,label\nimg/a.png,1\n";
  }
  {
    std::ofstream out(dir / "classes.txt");
    out << "cat\ndog\n\n";
  }
  const auto m = load_manifest(dir / "m.csv", 2);
  EXPECT_EQ(m.entries[0].path, dir / "img/a.png");
  EXPECT_EQ(load_class_names(dir / "classes.txt"), (std::vector<std::string>{"cat", "dog"}));
  std::filesystem::remove_all(dir);
}
