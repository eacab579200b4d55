#pragma once

// On-disk repository layout:
//
//   <root>/competences/*.xml   one <competence> per file
//   <root>/items/*.xml         <itemBank> files
//   <root>/learners/*.xml      one <learner> per file
//
// Missing subdirectories count as empty. Files are read in name order.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "placement/ims/types.hpp"
#include "placement/ims/validate.hpp"

namespace placement::ims {

/// Missing root directory, unreadable file or malformed XML.
class RepositoryIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Repository {
  std::vector<CompetenceDefinition> competences;
  std::vector<ItemDefinition> items;
  std::vector<LearnerProfile> profiles;

  [[nodiscard]] const CompetenceDefinition* find_competence(std::string_view id) const;
  [[nodiscard]] const LearnerProfile* find_profile(std::string_view id) const;
  [[nodiscard]] const ItemDefinition* find_item(std::string_view id) const;

  /// Items whose competence_ref is `competence_id`, in repository order.
  [[nodiscard]] std::vector<ItemDefinition> items_for(std::string_view competence_id) const;
};

struct LoadedRepository {
  Repository repository;
  // Files that parsed as XML but violated a value invariant.
  std::vector<Finding> load_findings;
  std::map<std::string, std::filesystem::path> profile_paths;
};

/// Throws RepositoryIoError for I/O problems and malformed XML.
[[nodiscard]] LoadedRepository load_repository(const std::filesystem::path& root);

/// load_repository + validate_repository, load findings first.
[[nodiscard]] ValidationReport validate_directory(const std::filesystem::path& root);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary file and rename().
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace placement::ims
