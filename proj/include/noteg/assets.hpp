#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace noteg {

struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const PixelRect&) const = default;
};

/// A region of a sprite sheet. The engine only tracks references; clients
/// resolve `sheet` through the asset manifest and do the pixel work.
///
/// A sheet name of the form "#rrggbb" denotes a solid-colour rectangle with
/// no backing image.
struct SpriteRef {
  std::string sheet;
  PixelRect rect;
  std::string name;

  bool is_color() const;
  bool operator==(const SpriteRef&) const = default;
};

/// One manifest entry: a sheet image and its slicing grid.
struct SheetInfo {
  std::string name;
  std::string path;  // relative to the notebook directory
  int width = 0;
  int height = 0;
  int tile_w = 0;
  int tile_h = 0;

  int cols() const { return tile_w > 0 ? width / tile_w : 0; }
  int rows() const { return tile_h > 0 ? height / tile_h : 0; }
  int cell_count() const { return cols() * rows(); }

  bool operator==(const SheetInfo&) const = default;
};

struct AssetManifest {
  std::vector<SheetInfo> entries;

  const SheetInfo* find(std::string_view name) const;
  /// Inserts or replaces the entry with the same name.
  void upsert(SheetInfo info);

  bool operator==(const AssetManifest&) const = default;
};

struct ImageSize {
  int width = 0;
  int height = 0;
};

/// Reads width/height from a PNG's IHDR chunk without decoding pixels.
/// Throws MissingDecoder for non-PNG data and BadDimensions for a truncated
/// or zero-sized header.
ImageSize read_png_size(std::span<const std::uint8_t> bytes);

/// Reads the header of the image at `path`. Throws MissingAsset if the file
/// cannot be opened.
ImageSize read_image_size(const std::filesystem::path& path);

/// Row-major cell `index` of `sheet`. Throws IndexOutOfRange.
SpriteRef sheet_sprite(const SheetInfo& sheet, int index);

/// Reference covering the whole sheet image; its `name` is the sheet name.
SpriteRef whole_sheet(const SheetInfo& sheet);

bool is_color_literal(std::string_view text);
/// Lower-cased copy of a valid "#RRGGBB" literal; throws InvalidColor.
std::string normalize_color(std::string_view text);
SpriteRef solid_color(std::string_view color, int w, int h);

/// Registers sheets against a manifest rooted at `root`.
///
/// Dimensions come from the file header when the file is present; when the
/// file is absent but the manifest already records the same path, the
/// recorded dimensions are used so headless replays do not need the images.
class SheetRegistry {
 public:
  SheetRegistry(std::filesystem::path root, AssetManifest& manifest)
      : root_(std::move(root)), manifest_(&manifest) {}

  SpriteRef load_sheet(const std::string& name, const std::string& path, int tile_w,
                       int tile_h);
  SpriteRef sprite(std::string_view sheet_name, int index) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  AssetManifest* manifest_;
};

}  // namespace noteg
