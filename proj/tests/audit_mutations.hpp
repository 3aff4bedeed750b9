#pragma once

// Single-fault audit fixtures: a pristine goodpkg context plus, for every
// policy, a mutation that seeds exactly one violation.

#include <fstream>
#include <memory>

#include "ecoforge/policy.hpp"
#include "support.hpp"

namespace testsupport {

inline PackageManifest read_manifest_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

inline void append_line(const fs::path& file, const std::string& line) {
    std::ofstream out(file, std::ios::app);
    out << line << "\n";
}

struct AuditFixture {
    std::shared_ptr<TempDir> scratch;
    PackageManifest manifest;
    std::shared_ptr<Registry> registry; // libbase + this manifest
    fs::path source_root;
    fs::path install_prefix;

    AuditContext context(AuditMode mode = AuditMode::static_only,
                         CommandExecutor* executor = nullptr) const {
        AuditContext ctx;
        ctx.manifest = manifest;
        ctx.source_root = source_root;
        ctx.install_prefix = install_prefix;
        ctx.mode = mode;
        ctx.registry = registry.get();
        ctx.executor = executor;
        return ctx;
    }
};

inline AuditFixture goodpkg_fixture() {
    AuditFixture f;
    f.scratch = std::make_shared<TempDir>();
    f.source_root = f.scratch->path() / "src";
    f.install_prefix = f.scratch->path() / "prefix";
    copy_tree(fixture_dir() / "goodpkg", f.source_root);
    copy_tree(fixture_dir() / "goodpkg_prefix", f.install_prefix);
    f.manifest =
        read_manifest_file(fixture_dir() / "audit_registry/goodpkg/1.2.3/package.xsdk.json");
    f.registry = std::make_shared<Registry>();
    f.registry->add(
        read_manifest_file(fixture_dir() / "audit_registry/libbase/1.4.2/package.xsdk.json"));
    f.registry->add(f.manifest);
    return f;
}

/// Applies the one-policy mutation for `target` to a fresh goodpkg fixture.
inline AuditFixture mutated_fixture(PolicyId target) {
    AuditFixture f = goodpkg_fixture();
    PackageManifest& m = f.manifest;

    switch (target) {
    case PolicyId::M1:
        m.build.system = "script"; // not attested for M1
        break;
    case PolicyId::M2:
        m.test_command.clear();
        break;
    case PolicyId::M3:
        append_line(f.source_root / "src/core.c", "static int goodpkg_world = MPI_COMM_WORLD;");
        break;
    case PolicyId::M4:
        m.attestations.erase("M4");
        break;
    case PolicyId::M5:
        m.contact.clear();
        break;
    case PolicyId::M6:
        m.attestations.erase("M6");
        break;
    case PolicyId::M7:
        m.license = "Proprietary";
        break;
    case PolicyId::M8:
        m.version_api = "goodpkg_current_version"; // symbol nowhere in the tree
        break;
    case PolicyId::M9:
        append_line(f.source_root / "exports.txt", "Matrix_Init");
        break;
    case PolicyId::M10:
        m.repo_url.clear();
        break;
    case PolicyId::M11:
        append_line(f.source_root / "src/core.c", "void goodpkg_trace(void) { printf(\"x\"); }");
        break;
    case PolicyId::M12:
        fs::create_directories(f.source_root / "third_party/libbase");
        append_line(f.source_root / "third_party/libbase/README", "bundled copy");
        break;
    case PolicyId::M13:
        append_line(f.install_prefix / "goodpkg_extra.h", "#pragma once");
        break;
    case PolicyId::M14:
        m.build.supports_64bit = false;
        break;
    case PolicyId::R1:
        m.repo_public = false;
        break;
    case PolicyId::R2:
        m.attestations.erase("R2");
        break;
    case PolicyId::R3:
        m.error_handling_doc.clear();
        break;
    case PolicyId::R4:
        m.attestations.erase("R4");
        break;
    case PolicyId::R5:
        m.dependencies[0].constraint = parse_constraint("^9.0.0");
        m.build.configure_command =
            "./configure --prefix={prefix} --with-libbase-dir={dep_dir:libbase}";
        break;
    }

    // The registry audits the mutated manifest, not the pristine one.
    f.registry = std::make_shared<Registry>();
    f.registry->add(
        read_manifest_file(fixture_dir() / "audit_registry/libbase/1.4.2/package.xsdk.json"));
    f.registry->add(f.manifest);
    return f;
}

} // namespace testsupport
