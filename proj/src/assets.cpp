#include "noteg/assets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "noteg/error.hpp"

namespace noteg {

namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

}  // namespace

bool SpriteRef::is_color() const { return is_color_literal(sheet); }

const SheetInfo* AssetManifest::find(std::string_view name) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const SheetInfo& s) { return s.name == name; });
  return it == entries.end() ? nullptr : &*it;
}

void AssetManifest::upsert(SheetInfo info) {
  for (auto& e : entries) {
    if (e.name == info.name) {
      e = std::move(info);
      return;
    }
  }
  entries.push_back(std::move(info));
}

ImageSize read_png_size(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPngSignature.size() ||
      !std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
    throw Error(ErrorCode::MissingDecoder, "only PNG sprite sheets are supported");
  }
  // signature(8) | length(4) | "IHDR"(4) | width(4) | height(4)
  if (bytes.size() < 24 || !std::equal(bytes.begin() + 12, bytes.begin() + 16, "IHDR")) {
    throw Error(ErrorCode::BadDimensions, "PNG header truncated or missing IHDR");
  }
  const std::uint32_t w = read_be32(bytes, 16);
  const std::uint32_t h = read_be32(bytes, 20);
  if (w == 0 || h == 0 || w > 0x7FFFFFFFu || h > 0x7FFFFFFFu) {
    throw Error(ErrorCode::BadDimensions, "PNG reports invalid dimensions");
  }
  return {static_cast<int>(w), static_cast<int>(h)};
}

ImageSize read_image_size(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingAsset, "cannot open " + path.string());
  std::array<std::uint8_t, 32> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  return read_png_size(std::span(head.data(), static_cast<std::size_t>(in.gcount())));
}

SpriteRef sheet_sprite(const SheetInfo& sheet, int index) {
  if (index < 0 || index >= sheet.cell_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "sprite index " + std::to_string(index) +
                                                " outside sheet '" + sheet.name + "' of " +
                                                std::to_string(sheet.cell_count()) + " cells");
  }
  const int col = index % sheet.cols();
  const int row = index / sheet.cols();
  return {sheet.name, {col * sheet.tile_w, row * sheet.tile_h, sheet.tile_w, sheet.tile_h},
          sheet.name + "[" + std::to_string(index) + "]"};
}

SpriteRef whole_sheet(const SheetInfo& sheet) {
  return {sheet.name, {0, 0, sheet.width, sheet.height}, sheet.name};
}

bool is_color_literal(std::string_view text) {
  return text.size() == 7 && text[0] == '#' &&
         std::all_of(text.begin() + 1, text.end(),
                     [](unsigned char c) { return std::isxdigit(c) != 0; });
}

std::string normalize_color(std::string_view text) {
  if (!is_color_literal(text)) {
    throw Error(ErrorCode::InvalidColor, "expected \"#RRGGBB\", got \"" + std::string(text) + "\"");
  }
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

SpriteRef solid_color(std::string_view color, int w, int h) {
  auto c = normalize_color(color);
  return {c, {0, 0, w, h}, c};
}

SpriteRef SheetRegistry::load_sheet(const std::string& name, const std::string& path, int tile_w,
                                    int tile_h) {
  if (name.empty()) throw Error(ErrorCode::MissingAsset, "sheet name must not be empty");
  if (is_color_literal(name)) {
    throw Error(ErrorCode::MissingAsset, "sheet name may not look like a colour: " + name);
  }
  std::filesystem::path rel(path);
  if (path.empty() || rel.is_absolute()) {
    throw Error(ErrorCode::MissingAsset, "asset paths must be relative: '" + path + "'");
  }
  if (tile_w <= 0 || tile_h <= 0) {
    throw Error(ErrorCode::BadDimensions, "tile size must be positive");
  }

  ImageSize size;
  const auto full = root_ / rel;
  std::error_code ec;
  if (std::filesystem::exists(full, ec)) {
    size = read_image_size(full);
  } else {
    const SheetInfo* known = manifest_->find(name);
    if (known == nullptr || known->path != path) {
      throw Error(ErrorCode::MissingAsset, "no such asset: " + path);
    }
    size = {known->width, known->height};
  }
  if (tile_w > size.width || tile_h > size.height) {
    throw Error(ErrorCode::BadDimensions, "tile " + std::to_string(tile_w) + "x" +
                                              std::to_string(tile_h) + " exceeds image " +
                                              std::to_string(size.width) + "x" +
                                              std::to_string(size.height));
  }
  SheetInfo info{name, path, size.width, size.height, tile_w, tile_h};
  manifest_->upsert(info);
  return whole_sheet(info);
}

SpriteRef SheetRegistry::sprite(std::string_view sheet_name, int index) const {
  const SheetInfo* sheet = manifest_->find(sheet_name);
  if (sheet == nullptr) {
    throw Error(ErrorCode::MissingAsset, "sheet not loaded: " + std::string(sheet_name));
  }
  return sheet_sprite(*sheet, index);
}

}  // namespace noteg
