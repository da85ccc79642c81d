#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "nbs/catalogue.hpp"

#ifndef NBS_DATA_DIR
#error "NBS_DATA_DIR must be defined"
#endif

namespace fixtures {

inline std::filesystem::path bundled_dir() { return NBS_DATA_DIR; }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = std::filesystem::temp_directory_path() / ("nbs-test-" + tag + "-" + std::to_string(rng()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path copy_bundled(const std::string& tag) {
    auto dir = temp_dir(tag);
    for (const auto& e : std::filesystem::directory_iterator(bundled_dir()))
        std::filesystem::copy_file(e.path(), dir / e.path().filename());
    return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// Two-leaf taxonomy: root "A" (leaf) and root "B" with leaves "B1", "B2".
inline std::vector<nbs::TaxonomyNode> small_taxonomy() {
    return {{"A", std::nullopt, 1, "is it A?"},
            {"B", std::nullopt, 1, "is it B?"},
            {"B1", std::string("B"), 2, "is it B1?"},
            {"B2", std::string("B"), 2, "is it B2?"}};
}

inline nbs::NbsEntry entry(std::string id, std::string leaf, std::map<std::string, std::vector<std::string>> labels) {
    nbs::NbsEntry e;
    e.id = id;
    e.final_name = "name of " + id;
    e.taxonomy_leaf = std::move(leaf);
    e.project_labels = std::move(labels);
    return e;
}

inline nbs::FacetDef uc(std::string id) { return {std::move(id), nbs::FacetKind::UrbanChallenge, std::nullopt, "uc"}; }
inline nbs::FacetDef es(std::string id, nbs::EsCategory c) {
    return {std::move(id), nbs::FacetKind::EcosystemService, c, "es"};
}

}  // namespace fixtures
