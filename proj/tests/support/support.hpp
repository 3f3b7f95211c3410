#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "crepair/context.hpp"
#include "crepair/corruption.hpp"
#include "crepair/nn/model.hpp"
#include "crepair/program.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return CREPAIR_TEST_DATA; }

// The generated C corpus, tokenized once per process.
const std::vector<crepair::TokenizedProgram>& corpus();

crepair::TokenizedProgram program_of(const std::vector<std::string>& lines,
                                     const std::string& id = "fixture");

// Context lines computed the slow way: for every symbol on line i, scan
// all lines and keep the one at minimal distance.
std::vector<crepair::LineIndex> brute_force_context(const crepair::TokenizedProgram& program,
                                                    const crepair::SymbolTables& tables,
                                                    crepair::LineIndex i);

// stdout of a shell command; status gets the exit code (-1 if it did not run).
std::string run_capture(const std::string& command, int* status = nullptr);

// Single-error variants of the first `parents` corpus programs, turned into
// examples under `hp`, with a vocabulary built from them.
struct NeuralFixture {
  crepair::nn::HyperParams hp;
  std::vector<crepair::BrokenProgram> broken;
  std::vector<crepair::nn::Example> examples;
  crepair::nn::Vocabulary vocab;
  std::vector<crepair::nn::PreparedExample> prepared;
};

NeuralFixture neural_fixture(const crepair::nn::HyperParams& hp, std::size_t parents,
                             std::size_t variants, std::uint64_t seed = 1);

}  // namespace testsupport
