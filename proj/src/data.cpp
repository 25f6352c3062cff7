#include "ssdaae/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ssdaae/errors.hpp"
#include "ssdaae/rng.hpp"

namespace ssdaae {

namespace {

constexpr std::size_t kImagePixels = kImageChannels * kImageSize * kImageSize;

Image to_image(std::span<const Scalar> pixels) {
  Image img(kImageSize, kImageSize);
  std::copy(pixels.begin(), pixels.end(), img.data.begin());
  return img;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

// ----- Dataset ---------------------------------------------------------------

std::size_t Dataset::labelled_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); }));
}

void Dataset::append(std::string id, std::optional<int> label, std::span<const Scalar> pixels) {
  if (pixels.size() != kImagePixels) {
    throw ShapeError("dataset images must hold 3x64x64 values, got " + std::to_string(pixels.size()));
  }
  if (label && *label != 0 && *label != 1) throw DomainError("labels must be 0 or 1");
  std::vector<Scalar> values = std::move(images.values());
  values.insert(values.end(), pixels.begin(), pixels.end());
  ids.push_back(std::move(id));
  labels.push_back(label);
  images = FTensor(Shape{ids.size(), kImageChannels, kImageSize, kImageSize}, std::move(values));
}

std::span<const Scalar> Dataset::pixels(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("dataset index out of range");
  return images.data().subspan(i * kImagePixels, kImagePixels);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  std::vector<Scalar> values;
  values.reserve(indices.size() * kImagePixels);
  for (std::size_t i : indices) {
    auto px = pixels(i);
    values.insert(values.end(), px.begin(), px.end());
    out.ids.push_back(ids[i]);
    out.labels.push_back(labels[i]);
  }
  out.images = FTensor(Shape{indices.size(), kImageChannels, kImageSize, kImageSize}, std::move(values));
  return out;
}

DataBatch Dataset::batch(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw ContractError("empty batch selection");
  const bool first = labels.at(indices[0]).has_value();
  for (std::size_t i : indices) {
    if (labels.at(i).has_value() != first) throw ProtocolError("batch mixes labelled and unlabelled images");
  }
  Dataset sub = subset(indices);
  DataBatch b;
  b.images = std::move(sub.images);
  b.ids = std::move(sub.ids);
  if (first) {
    FTensor y(Shape{indices.size(), 1});
    for (std::size_t k = 0; k < indices.size(); ++k) y[k] = static_cast<Scalar>(*sub.labels[k]);
    b.labels = std::move(y);
  }
  return b;
}

Dataset Dataset::without_labels() const {
  Dataset out = *this;
  std::fill(out.labels.begin(), out.labels.end(), std::nullopt);
  return out;
}

// ----- identifier-patch removal ---------------------------------------------

bool SkinProfile::matches(float r, float g, float b) const {
  const double sum = static_cast<double>(r) + g + b;
  if (sum <= 0.0 || sum / 3.0 < min_brightness) return false;
  const double rn = r / sum, gn = g / sum;
  return rn >= r_min && rn <= r_max && gn >= g_min && gn <= g_max;
}

Mask skin_mask(const Image& image, const SkinProfile& profile) {
  Mask m{image.height, image.width, std::vector<std::uint8_t>(image.height * image.width)};
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      m.cells[y * image.width + x] = profile.matches(image.at(0, y, x), image.at(1, y, x), image.at(2, y, x));
    }
  }
  return m;
}

Mask downsample_mask(const Mask& mask, std::size_t grid, std::size_t& block) {
  if (grid == 0) throw ConfigError("mask grid must be positive");
  const std::size_t longer = std::max(mask.height, mask.width);
  block = std::max<std::size_t>(1, (longer + grid - 1) / grid);
  Mask out{(mask.height + block - 1) / block, (mask.width + block - 1) / block, {}};
  out.cells.assign(out.height * out.width, 1);
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      if (!mask.at(y, x)) out.cells[(y / block) * out.width + x / block] = 0;
    }
  }
  return out;
}

Rect largest_rectangle(const Mask& mask) {
  Rect best;
  auto better = [&](const Rect& r) {
    if (r.area() != best.area()) return r.area() > best.area();
    if (r.top != best.top) return r.top < best.top;
    if (r.left != best.left) return r.left < best.left;
    return r.height < best.height;
  };
  const std::size_t w = mask.width;
  std::vector<std::size_t> heights(w, 0), left(w), right(w), stack;
  for (std::size_t row = 0; row < mask.height; ++row) {
    for (std::size_t c = 0; c < w; ++c) heights[c] = mask.at(row, c) ? heights[c] + 1 : 0;
    // Nearest strictly lower bar on each side; every maximal rectangle with its
    // bottom edge on this row is the span of some bar.
    stack.clear();
    for (std::size_t c = 0; c < w; ++c) {
      while (!stack.empty() && heights[stack.back()] >= heights[c]) stack.pop_back();
      left[c] = stack.empty() ? 0 : stack.back() + 1;
      stack.push_back(c);
    }
    stack.clear();
    for (std::size_t c = w; c-- > 0;) {
      while (!stack.empty() && heights[stack.back()] >= heights[c]) stack.pop_back();
      right[c] = stack.empty() ? w : stack.back();
      stack.push_back(c);
    }
    for (std::size_t c = 0; c < w; ++c) {
      if (heights[c] == 0) continue;
      Rect r{row + 1 - heights[c], left[c], heights[c], right[c] - left[c]};
      if (better(r)) best = r;
    }
  }
  return best;
}

PatchRemovalResult remove_identifier_patch(const Image& image, const PatchRemovalConfig& config) {
  if (image.empty()) return {std::nullopt, {}, "empty image"};
  std::size_t block = 1;
  const Mask cells = downsample_mask(skin_mask(image, config.skin), config.grid, block);
  const Rect r = largest_rectangle(cells);
  if (r.area() == 0) return {std::nullopt, {}, "no skin-coloured region"};
  Rect px{r.top * block, r.left * block, 0, 0};
  px.height = std::min(r.height * block, image.height - px.top);
  px.width = std::min(r.width * block, image.width - px.left);
  if (px.height < config.min_rect_pixels || px.width < config.min_rect_pixels) {
    return {std::nullopt, px,
            "skin rectangle " + std::to_string(px.height) + "x" + std::to_string(px.width) + " below minimum " +
                std::to_string(config.min_rect_pixels)};
  }
  return {to_model_resolution(crop(image, px.top, px.left, px.height, px.width), kImageSize), px, ""};
}

// ----- ingestion ------------------------------------------------------------

namespace {

std::map<std::string, int> read_labels_csv(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw IngestionError("cannot open labels file " + csv.string());
  std::map<std::string, int> labels;
  std::vector<std::string> conflicts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IngestionError(csv.string() + ":" + std::to_string(line_no) + ": expected `id,label`");
    }
    std::string id = trim(line.substr(0, comma));
    std::string value = trim(line.substr(comma + 1));
    if (line_no == 1 && id == "id" && value == "label") continue;
    std::transform(value.begin(), value.end(), value.begin(), [](unsigned char c) { return std::tolower(c); });
    int label;
    if (value == "malignant" || value == "1") {
      label = 1;
    } else if (value == "benign" || value == "0") {
      label = 0;
    } else {
      throw IngestionError(csv.string() + ":" + std::to_string(line_no) + ": unknown label '" + value + "'");
    }
    auto [it, inserted] = labels.emplace(id, label);
    if (!inserted && it->second != label) conflicts.push_back(id);
  }
  if (!conflicts.empty()) {
    std::string msg = "conflicting labels for id(s):";
    for (const auto& id : conflicts) msg += " " + id;
    throw IngestionError(msg);
  }
  return labels;
}

}  // namespace

IngestReport ingest(const std::filesystem::path& image_dir, const std::filesystem::path& labels_csv,
                    const IngestOptions& options) {
  if (!std::filesystem::is_directory(image_dir)) {
    throw IngestionError("image directory not found: " + image_dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(image_dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, std::filesystem::path> by_id;
  for (const auto& f : files) {
    const std::string stem = f.stem().string();
    if (!by_id.emplace(stem, f).second) throw IngestionError("ambiguous image id '" + stem + "'");
  }

  std::map<std::string, int> labels;
  if (!labels_csv.empty()) {
    for (auto& [id, label] : read_labels_csv(labels_csv)) {
      // CSV ids may carry the file extension.
      const std::string key = by_id.count(id) ? id : std::filesystem::path(id).stem().string();
      labels[key] = label;
      if (!by_id.count(key)) labels[key] = -1;
    }
    std::string missing;
    for (const auto& [id, label] : labels) {
      if (label < 0) missing += " " + id;
    }
    if (!missing.empty()) throw IngestionError("labels CSV ids without image files:" + missing);
  }

  IngestReport report;
  for (const auto& [id, path] : by_id) {
    std::optional<Image> img = load_image(path);
    if (!img) {
      report.undecodable.push_back(id);
      continue;
    }
    Image resized;
    if (options.remove_patches) {
      auto result = remove_identifier_patch(*img, options.patch);
      if (!result.image) {
        report.rejected.push_back(id);
        continue;
      }
      resized = std::move(*result.image);
    } else {
      resized = to_model_resolution(*img, kImageSize);
    }
    auto it = labels.find(id);
    report.dataset.append(id, it == labels.end() ? std::nullopt : std::optional<int>(it->second), resized.data);
  }
  return report;
}

// ----- augmentation ---------------------------------------------------------

Image flip_horizontal(const Image& image) {
  Image out(image.height, image.width);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < image.height; ++y) {
      for (std::size_t x = 0; x < image.width; ++x) out.at(c, y, x) = image.at(c, y, image.width - 1 - x);
    }
  }
  return out;
}

Image flip_vertical(const Image& image) {
  Image out(image.height, image.width);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < image.height; ++y) {
      for (std::size_t x = 0; x < image.width; ++x) out.at(c, y, x) = image.at(c, image.height - 1 - y, x);
    }
  }
  return out;
}

namespace {

// Mirror a coordinate into [0, n - 1] without repeating the edge sample.
double reflect(double v, std::size_t n) {
  if (n == 1) return 0.0;
  const double last = static_cast<double>(n - 1);
  const double period = 2.0 * last;
  v = std::fmod(std::abs(v), period);
  return v > last ? period - v : v;
}

}  // namespace

Image rotate(const Image& image, double degrees) {
  Image out(image.height, image.width);
  const double rad = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const double cy = (static_cast<double>(image.height) - 1) / 2.0;
  const double cx = (static_cast<double>(image.width) - 1) / 2.0;
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
      const double sx = reflect(cs * dx + sn * dy + cx, image.width);
      const double sy = reflect(-sn * dx + cs * dy + cy, image.height);
      const auto x0 = static_cast<std::size_t>(sx), y0 = static_cast<std::size_t>(sy);
      const std::size_t x1 = std::min(x0 + 1, image.width - 1), y1 = std::min(y0 + 1, image.height - 1);
      const double wx = sx - static_cast<double>(x0), wy = sy - static_cast<double>(y0);
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = (image.at(c, y0, x0) * (1 - wx) + image.at(c, y0, x1) * wx) * (1 - wy) +
                         (image.at(c, y1, x0) * (1 - wx) + image.at(c, y1, x1) * wx) * wy;
        out.at(c, y, x) = static_cast<float>(v);
      }
    }
  }
  return out;
}

Dataset augment(const Dataset& data, std::uint64_t seed) {
  Dataset out;
  std::vector<Scalar> values;
  values.reserve(data.size() * 4 * kImagePixels);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Image src = to_image(data.pixels(i));
    Rng rng(mix_seed(seed, data.ids[i]));
    const double angle = 180.0 - 360.0 * rng.uniform();  // (-180, 180]
    const std::pair<const char*, Image> variants[] = {
        {"#orig", src}, {"#hflip", flip_horizontal(src)}, {"#vflip", flip_vertical(src)}, {"#rot", rotate(src, angle)}};
    for (const auto& [suffix, img] : variants) {
      out.ids.push_back(data.ids[i] + suffix);
      out.labels.push_back(data.labels[i]);
      for (float v : img.data) values.push_back(std::clamp(v, 0.0f, 1.0f));
    }
  }
  out.images = FTensor(Shape{out.ids.size(), kImageChannels, kImageSize, kImageSize}, std::move(values));
  return out;
}

// ----- splits ----------------------------------------------------------------

Splits split(const Dataset& data, const SplitSpec& spec) {
  if (std::set<std::string>(data.ids.begin(), data.ids.end()).size() != data.size()) {
    throw ConfigError("dataset ids are not unique");
  }
  std::vector<std::size_t> pos, neg, unl;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data.labels[i]) {
      unl.push_back(i);
    } else {
      (*data.labels[i] == 1 ? pos : neg).push_back(i);
    }
  }
  const std::size_t need_labelled = spec.n_test + spec.n_val + spec.n_labelled_train;
  const std::size_t have_labelled = pos.size() + neg.size();
  if (need_labelled > have_labelled) {
    throw ConfigError("split needs " + std::to_string(need_labelled) + " labelled images but only " +
                      std::to_string(have_labelled) + " are available (short by " +
                      std::to_string(need_labelled - have_labelled) + ")");
  }
  if (spec.n_unlabelled > data.size() - need_labelled) {
    throw ConfigError("split needs " + std::to_string(spec.n_unlabelled) + " unlabelled images but only " +
                      std::to_string(data.size() - need_labelled) + " remain (short by " +
                      std::to_string(spec.n_unlabelled - (data.size() - need_labelled)) + ")");
  }

  Rng rng(mix_seed(spec.seed, "split"));
  std::shuffle(pos.begin(), pos.end(), rng.engine());
  std::shuffle(neg.begin(), neg.end(), rng.engine());
  std::shuffle(unl.begin(), unl.end(), rng.engine());

  const double pos_fraction = have_labelled ? static_cast<double>(pos.size()) / have_labelled : 0.0;
  std::size_t pi = 0, ni = 0;
  auto take = [&](std::size_t n) {
    std::size_t n_pos = static_cast<std::size_t>(std::llround(pos_fraction * static_cast<double>(n)));
    n_pos = std::min(n_pos, pos.size() - pi);
    std::size_t n_neg = n - n_pos;
    if (n_neg > neg.size() - ni) {
      n_neg = neg.size() - ni;
      n_pos = n - n_neg;
    }
    std::vector<std::size_t> idx(pos.begin() + pi, pos.begin() + pi + n_pos);
    idx.insert(idx.end(), neg.begin() + ni, neg.begin() + ni + n_neg);
    pi += n_pos;
    ni += n_neg;
    std::sort(idx.begin(), idx.end());
    return data.subset(idx);
  };

  Splits out;
  out.test = take(spec.n_test);
  out.val = take(spec.n_val);
  out.labelled_train = take(spec.n_labelled_train);

  std::vector<std::size_t> leftovers(pos.begin() + pi, pos.end());
  leftovers.insert(leftovers.end(), neg.begin() + ni, neg.end());
  std::shuffle(leftovers.begin(), leftovers.end(), rng.engine());
  std::vector<std::size_t> pool = unl;
  pool.insert(pool.end(), leftovers.begin(), leftovers.end());
  pool.resize(spec.n_unlabelled);
  std::sort(pool.begin(), pool.end());
  out.unlabelled = data.subset(pool).without_labels();
  return out;
}

// ----- synthetic lesions -----------------------------------------------------

Dataset synth_generate(const SynthSpec& spec) {
  constexpr double kPi = std::numbers::pi;
  const std::size_t n = 2 * spec.n_per_class;
  Dataset out;
  std::vector<Scalar> values(n * kImagePixels);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const bool malignant = label == 1;
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(i)));

    // Nuisance: skin tone, shading, position, size.
    const double skin_r = rng.uniform(0.72, 0.95);
    const double skin_g = skin_r * rng.uniform(0.66, 0.80);
    const double skin_b = skin_g * rng.uniform(0.72, 0.90);
    const double shade_angle = rng.uniform(0.0, 2 * kPi);
    const double shade = rng.uniform(0.0, 0.08);
    const double cx = 31.5 + rng.uniform(-7.0, 7.0);
    const double cy = 31.5 + rng.uniform(-7.0, 7.0);
    const double radius = rng.uniform(10.0, 16.0);
    const double lesion_dark = rng.uniform(0.35, 0.6);

    // Class-dependent shape and texture.
    const double asym = std::clamp(malignant ? rng.normal(0.35, 0.08) : rng.normal(0.08, 0.04), 0.0, 0.6);
    const double border = std::clamp(malignant ? rng.normal(0.14, 0.04) : rng.normal(0.03, 0.015), 0.0, 0.3);
    const double tex_freq = malignant ? rng.uniform(0.9, 1.4) : rng.uniform(0.25, 0.45);
    const double tex_amp = malignant ? rng.uniform(0.12, 0.22) : rng.uniform(0.03, 0.08);
    const double orient = rng.uniform(0.0, 2 * kPi);
    double harm_phase[6];
    for (double& p : harm_phase) p = rng.uniform(0.0, 2 * kPi);
    const double tex_phase_x = rng.uniform(0.0, 2 * kPi), tex_phase_y = rng.uniform(0.0, 2 * kPi);
    const double tex_dir = rng.uniform(0.0, kPi);

    Scalar* img = values.data() + i * kImagePixels;
    const std::size_t plane = kImageSize * kImageSize;
    for (std::size_t y = 0; y < kImageSize; ++y) {
      for (std::size_t x = 0; x < kImageSize; ++x) {
        const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
        const double theta = std::atan2(dy, dx);
        // Asymmetry stretches one side of the blob; the border harmonics wobble it.
        double r_edge = radius * (1.0 + asym * std::cos(theta - orient));
        for (int k = 0; k < 6; ++k) r_edge *= 1.0 + border * std::cos((k + 3) * theta + harm_phase[k]) / (1 + 0.3 * k);
        const double dist = std::sqrt(dx * dx + dy * dy);
        const double inside = 1.0 / (1.0 + std::exp((dist - r_edge) / 1.2));
        const double u = dx * std::cos(tex_dir) + dy * std::sin(tex_dir);
        const double v = -dx * std::sin(tex_dir) + dy * std::cos(tex_dir);
        const double texture =
            tex_amp * std::sin(tex_freq * u + tex_phase_x) * std::cos(tex_freq * v + tex_phase_y);
        const double light = 1.0 + shade * ((dx * std::cos(shade_angle) + dy * std::sin(shade_angle)) / 32.0);
        const double lesion = std::clamp(lesion_dark * (1.0 + texture), 0.0, 1.0);
        const double rgb[3] = {skin_r, skin_g, skin_b};
        const double tint[3] = {1.0, 0.8, malignant ? 0.95 : 0.75};
        for (std::size_t c = 0; c < 3; ++c) {
          const double bg = rgb[c] * light;
          const double fg = rgb[c] * lesion * tint[c];
          const double value = bg * (1 - inside) + fg * inside + rng.normal(0.0, 0.01);
          img[c * plane + y * kImageSize + x] = static_cast<Scalar>(std::clamp(value, 0.0, 1.0));
        }
      }
    }
    out.ids.push_back("synth_" + std::to_string(i));
    out.labels.push_back(label);
  }
  out.images = FTensor(Shape{n, kImageChannels, kImageSize, kImageSize}, std::move(values));
  return out;
}

// ----- files -----------------------------------------------------------------

namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
  return v;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  v = to_le(v);
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return to_le(v);
}

constexpr const char* kSplitNames[] = {"unlabelled", "labelled_train", "val", "test"};

Dataset* split_member(Splits& s, std::string_view name) {
  if (name == "unlabelled") return &s.unlabelled;
  if (name == "labelled_train") return &s.labelled_train;
  if (name == "val") return &s.val;
  return &s.test;
}

}  // namespace

void write_tensor_file(const std::filesystem::path& path, const FTensor& images) {
  const Shape& s = images.shape();
  if (s.size() != 4 || s[1] != kImageChannels || s[2] != kImageSize || s[3] != kImageSize) {
    throw ShapeError("tensor file images must be [N x 3 x 64 x 64], got " + to_string(s));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t d : s) write_u32(out, static_cast<std::uint32_t>(d));
  for (float v : images.values()) write_u32(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

FTensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open tensor file " + path.string());
  Shape s(4);
  for (auto& d : s) d = read_u32(in);
  if (!in || s[1] != kImageChannels || s[2] != kImageSize || s[3] != kImageSize) {
    throw IngestionError("bad tensor file header in " + path.string());
  }
  std::vector<float> values(numel(s));
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
  if (static_cast<std::size_t>(in.gcount()) != values.size() * 4) {
    throw IngestionError("truncated tensor file " + path.string());
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IngestionError("trailing bytes in " + path.string());
  if constexpr (std::endian::native == std::endian::big) {
    for (float& v : values) v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
  }
  return FTensor(s, std::move(values));
}

void write_dataset_dir(const std::filesystem::path& dir, const Splits& splits, const DatasetManifestExtras& extras) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["format"] = "ssdaae-dataset";
  manifest["version"] = 1;
  manifest["tensor_layout"] = "u32le[count,3,64,64] then f32le values, channel-major per image";
  manifest["seed"] = extras.seed;
  manifest["augmented"] = extras.augmented;
  manifest["rejected"] = extras.rejected;
  manifest["undecodable"] = extras.undecodable;
  Splits& s = const_cast<Splits&>(splits);
  for (const char* name : kSplitNames) {
    const Dataset& d = *split_member(s, name);
    const std::string file = std::string(name) + ".f32";
    write_tensor_file(dir / file, d.images);
    nlohmann::ordered_json entry;
    entry["file"] = file;
    entry["count"] = d.size();
    entry["ids"] = d.ids;
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : d.labels) labels.push_back(l ? nlohmann::json(*l) : nlohmann::json());
    entry["labels"] = labels;
    manifest["splits"][name] = entry;
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

Splits read_dataset_dir(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IngestionError("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError("malformed dataset manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "ssdaae-dataset") throw IngestionError("not a dataset manifest");
  Splits out;
  for (const char* name : kSplitNames) {
    if (!manifest["splits"].contains(name)) continue;
    const auto& entry = manifest["splits"][name];
    Dataset& d = *split_member(out, name);
    d.images = read_tensor_file(dir / entry.at("file").get<std::string>());
    d.ids = entry.at("ids").get<std::vector<std::string>>();
    for (const auto& l : entry.at("labels")) {
      d.labels.push_back(l.is_null() ? std::nullopt : std::optional<int>(l.get<int>()));
    }
    if (d.ids.size() != d.images.dim(0) || d.labels.size() != d.ids.size()) {
      throw IngestionError(std::string("split '") + name + "' manifest does not match its tensor file");
    }
  }
  return out;
}

}  // namespace ssdaae
