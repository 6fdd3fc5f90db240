#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "enrnn/matrix.hpp"
#include "enrnn/rng.hpp"
#include "enrnn/tensor.hpp"

namespace enrnn {

enum class TaskKind { Adding, Copying };
enum class LossMode { TerminalMse, SequenceXent };

TaskKind task_from_string(const std::string& name);
std::string to_string(TaskKind t);

// Adding: m = 2, p = 1. Channel 0 holds values from U[0,1); channel 1 is
// zero except for single 1-markers in each half of the sequence. The target
// is the sum of the two marked values.
//
// Copying: m = 10 one-hot over {0 blank, 1..8 data, 9 marker}, p = 9.
// Input layout over tau = T+20 steps: 10 data digits, T-1 blanks, the
// marker, then blanks to the end; the marker cues recall of the data on the
// final 10 steps. Targets are blank for T+10 steps, then the 10 digits.
struct TaskBatch {
    Tensor3 inputs;                   // batch x tau x m
    DenseMatrix targets_real;         // adding: batch x 1
    std::vector<int> targets_class;   // copying: batch*tau class indices
    LossMode loss_mode = LossMode::TerminalMse;
    std::uint64_t seed = 0;           // seed of the generator that produced it
};

TaskBatch gen_adding(std::size_t batch, std::size_t T, Rng& rng);
TaskBatch gen_copying(std::size_t batch, std::size_t T, Rng& rng);

// Analytic no-memory baselines: 0.167 MSE for adding (predicting 1.0
// regardless of input), 10*ln(8)/(T+20) cross-entropy for copying (uniform
// guess over the 8 digits at the recall steps).
double baseline_value(TaskKind task, std::size_t T);

std::size_t task_input_dim(TaskKind task);
std::size_t task_output_dim(TaskKind task);
std::size_t task_sequence_length(TaskKind task, std::size_t T);

// Self-describing binary tensor file: magic "ENR1", then little-endian
// u64 rank and dims, then the row-major 64-bit-real payload.
void write_tensor_file(const std::filesystem::path& path,
                       const std::vector<std::uint64_t>& dims,
                       const std::vector<double>& data);
struct TensorFile {
    std::vector<std::uint64_t> dims;
    std::vector<double> data;
};
TensorFile read_tensor_file(const std::filesystem::path& path);

}  // namespace enrnn
