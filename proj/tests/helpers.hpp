#pragma once

// Shared test plumbing: fixture loading and a popen-based runner for the CLI
// binary (paths injected by CMake).

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string fixture_dir() { return CNTMF_FIXTURE_DIR; }
inline std::string golden_dir() { return CNTMF_GOLDEN_DIR; }
inline std::string tool_path() { return CNTMF_TOOL_PATH; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string fixture(const std::string& name) { return read_file(fixture_dir() + "/" + name); }

struct ToolResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr interleaved
};

// Runs the built CLI with the given argument string (already shell-quoted).
inline ToolResult run_tool(const std::string& args) {
    const std::string command = tool_path() + " " + args + " 2>&1";
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    ToolResult result;
    std::array<char, 4096> buffer{};
    std::size_t n = 0;
    while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.output.append(buffer.data(), n);
    }
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

inline bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace testutil
