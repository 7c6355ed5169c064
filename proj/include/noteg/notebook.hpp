#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "noteg/assets.hpp"
#include "noteg/error.hpp"

namespace noteg {

inline constexpr int kNotebookVersion = 1;

enum class CellKind { Code, Doc };

struct Cell {
  std::string id;
  CellKind kind = CellKind::Code;
  bool hidden = false;
  std::string source;

  bool operator==(const Cell&) const = default;
};

/// The shareable unit: cells plus the seed and asset manifest needed to
/// replay them. Stored as `.noteg.json`.
struct Notebook {
  int version = kNotebookVersion;
  std::uint64_t seed = 42;
  AssetManifest assets;
  std::vector<Cell> cells;

  Cell* find(std::string_view id);
  const Cell* find(std::string_view id) const;

  bool operator==(const Notebook&) const = default;
};

/// Schema violation; `path()` is a JSON pointer to the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Canonical bytes: sorted keys, two-space indent, LF, trailing newline.
std::string save_notebook(const Notebook& nb);
Notebook load_notebook(std::string_view bytes);

Notebook read_notebook_file(const std::filesystem::path& path);
void write_notebook_file(const std::filesystem::path& path, const Notebook& nb);

}  // namespace noteg
