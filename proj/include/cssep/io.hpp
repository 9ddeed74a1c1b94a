#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cssep/atom_list.hpp"
#include "cssep/quartic_form.hpp"

namespace cssep {

// csmat-v1 files: UTF-8 JSON
//   {"format":"csmat-v1","n":N,"repr":"lowrank","weights":[...],"vectors":[[...],...]}
//   {"format":"csmat-v1","n":N,"repr":"dense","entries":[N^4 values, (i,j,k,l) row-major]}
//   {"format":"csmat-v1","n":N,"repr":"sumkernel","phi":[4N-3 values]}
//   {"format":"csmat-v1","n":N,"repr":"atoms","mode":"cone","weights":[...],"vectors":[...]}

inline constexpr const char* kFormatVersion = "csmat-v1";

struct FormFile {
  QuarticForm form;
  /// Set when a low-rank vector was not unit and its weight was rescaled.
  bool normalized_vectors = false;
};

struct AtomFile {
  AtomList atoms;
  bool normalized_vectors = false;
};

nlohmann::json form_to_json(const QuarticForm& form);
nlohmann::json atoms_to_json(const AtomList& atoms);

/// Throws MalformedFile, UnsupportedVersion or DimensionMismatch.
FormFile form_from_json(const nlohmann::json& doc);
AtomFile atoms_from_json(const nlohmann::json& doc);

/// Serialized text, ending with a newline.
std::string dump(const nlohmann::json& doc);

FormFile read_form(const std::filesystem::path& path);
AtomFile read_atoms(const std::filesystem::path& path);
void write_form(const std::filesystem::path& path, const QuarticForm& form);
void write_atoms(const std::filesystem::path& path, const AtomList& atoms);

}  // namespace cssep
