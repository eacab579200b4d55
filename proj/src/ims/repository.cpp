#include "placement/ims/repository.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "placement/ims/formats.hpp"
#include "placement/ims/xml.hpp"

namespace placement::ims {

namespace fs = std::filesystem;

const CompetenceDefinition* Repository::find_competence(std::string_view id) const {
  for (const auto& c : competences) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const LearnerProfile* Repository::find_profile(std::string_view id) const {
  for (const auto& p : profiles) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const ItemDefinition* Repository::find_item(std::string_view id) const {
  for (const auto& i : items) {
    if (i.id == id) return &i;
  }
  return nullptr;
}

std::vector<ItemDefinition> Repository::items_for(std::string_view competence_id) const {
  std::vector<ItemDefinition> out;
  for (const auto& i : items) {
    if (i.competence_ref == competence_id) out.push_back(i);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RepositoryIoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw RepositoryIoError("cannot read " + path.string());
  return buf.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RepositoryIoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw RepositoryIoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw RepositoryIoError("cannot replace " + path.string() + ": " + ec.message());
}

namespace {

std::vector<fs::path> xml_files(const fs::path& dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::exists(dir, ec)) return out;
  if (!fs::is_directory(dir, ec)) throw RepositoryIoError(dir.string() + " is not a directory");
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".xml") out.push_back(it->path());
  }
  if (ec) throw RepositoryIoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Fn>
void load_each(const fs::path& dir, LoadedRepository& out, Fn&& on_document) {
  for (const auto& file : xml_files(dir)) {
    const std::string text = read_file(file);
    try {
      on_document(file, text);
    } catch (const xml::ParseError& e) {
      throw RepositoryIoError(file.string() + ": " + e.what());
    } catch (const ValidationError& e) {
      out.load_findings.push_back(Finding{Severity::Error, FindingKind::ParseFailure,
                                          e.subject(), file.filename().string() + ": " + e.what(),
                                          {}});
    }
  }
}

}  // namespace

LoadedRepository load_repository(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw RepositoryIoError("repository directory not found: " + root.string());
  }
  LoadedRepository out;
  load_each(root / "competences", out, [&](const fs::path&, const std::string& text) {
    out.repository.competences.push_back(parse_competence(text));
  });
  load_each(root / "items", out, [&](const fs::path&, const std::string& text) {
    auto items = parse_item_bank(text);
    std::move(items.begin(), items.end(), std::back_inserter(out.repository.items));
  });
  load_each(root / "learners", out, [&](const fs::path& file, const std::string& text) {
    auto profile = parse_profile(text);
    out.profile_paths.emplace(profile.id, file);
    out.repository.profiles.push_back(std::move(profile));
  });
  return out;
}

ValidationReport validate_directory(const fs::path& root) {
  LoadedRepository loaded = load_repository(root);
  ValidationReport report = validate_repository(
      loaded.repository.competences, loaded.repository.items, loaded.repository.profiles);
  report.findings.insert(report.findings.begin(), loaded.load_findings.begin(),
                         loaded.load_findings.end());
  return report;
}

}  // namespace placement::ims
