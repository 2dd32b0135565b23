#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "advlb/classifier.hpp"
#include "advlb/errors.hpp"
#include "advlb/image.hpp"

namespace advlb {

// Labeled images, loaded on demand in the classifier's input frame.
class ImageSource {
 public:
  virtual ~ImageSource() = default;
  virtual std::size_t size() const = 0;
  virtual LabelId label(std::size_t i) const = 0;
  virtual std::string name(std::size_t i) const = 0;
  virtual ImageBuffer load(std::size_t i) const = 0;
};

class InMemorySource final : public ImageSource {
 public:
  struct Entry {
    std::string name;
    LabelId label = 0;
    ImageBuffer image;
  };

  InMemorySource() = default;
  explicit InMemorySource(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  void add(std::string name, LabelId label, ImageBuffer image) {
    entries_.push_back({std::move(name), label, std::move(image)});
  }

  std::size_t size() const override { return entries_.size(); }
  LabelId label(std::size_t i) const override { return entries_.at(i).label; }
  std::string name(std::size_t i) const override { return entries_.at(i).name; }
  ImageBuffer load(std::size_t i) const override { return entries_.at(i).image; }

 private:
  std::vector<Entry> entries_;
};

}  // namespace advlb
