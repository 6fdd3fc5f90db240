#include "enrnn/tasks.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace enrnn {

TaskKind task_from_string(const std::string& name) {
    if (name == "adding") return TaskKind::Adding;
    if (name == "copying") return TaskKind::Copying;
    throw ContractViolation("unknown task: " + name);
}

std::string to_string(TaskKind t) {
    return t == TaskKind::Adding ? "adding" : "copying";
}

std::size_t task_input_dim(TaskKind task) { return task == TaskKind::Adding ? 2 : 10; }
std::size_t task_output_dim(TaskKind task) { return task == TaskKind::Adding ? 1 : 9; }

std::size_t task_sequence_length(TaskKind task, std::size_t T) {
    return task == TaskKind::Adding ? T : T + 20;
}

TaskBatch gen_adding(std::size_t batch, std::size_t T, Rng& rng) {
    if (T < 2) throw ContractViolation("gen_adding: T must be >= 2");
    TaskBatch out;
    out.seed = rng.seed();
    out.loss_mode = LossMode::TerminalMse;
    out.inputs = Tensor3(batch, T, 2);
    out.targets_real = DenseMatrix(batch, 1);
    const std::size_t half = T / 2;
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t t = 0; t < T; ++t) out.inputs.at(b, t, 0) = rng.uniform();
        const std::size_t p1 = rng.uniform_int(half);
        const std::size_t p2 = half + rng.uniform_int(T - half);
        out.inputs.at(b, p1, 1) = 1.0;
        out.inputs.at(b, p2, 1) = 1.0;
        out.targets_real(b, 0) = out.inputs.at(b, p1, 0) + out.inputs.at(b, p2, 0);
    }
    return out;
}

TaskBatch gen_copying(std::size_t batch, std::size_t T, Rng& rng) {
    if (T < 1) throw ContractViolation("gen_copying: T must be >= 1");
    TaskBatch out;
    out.seed = rng.seed();
    out.loss_mode = LossMode::SequenceXent;
    const std::size_t tau = T + 20;
    out.inputs = Tensor3(batch, tau, 10);
    out.targets_class.assign(batch * tau, 0);
    for (std::size_t b = 0; b < batch; ++b) {
        int digits[10];
        for (int& d : digits) d = 1 + static_cast<int>(rng.uniform_int(8));
        for (std::size_t t = 0; t < tau; ++t) {
            int sym = 0;
            if (t < 10) sym = digits[t];
            else if (t == T + 9) sym = 9;  // recall marker, 10 steps before the end
            out.inputs.at(b, t, static_cast<std::size_t>(sym)) = 1.0;
        }
        for (std::size_t k = 0; k < 10; ++k)
            out.targets_class[b * tau + (T + 10 + k)] = digits[k];
    }
    return out;
}

double baseline_value(TaskKind task, std::size_t T) {
    if (task == TaskKind::Adding) return 0.167;
    return 10.0 * std::log(8.0) / static_cast<double>(T + 20);
}

namespace {
void write_u64(std::ofstream& f, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    f.write(reinterpret_cast<const char*>(buf), 8);
}
std::uint64_t read_u64(std::ifstream& f) {
    unsigned char buf[8];
    f.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}
}  // namespace

void write_tensor_file(const std::filesystem::path& path,
                       const std::vector<std::uint64_t>& dims,
                       const std::vector<double>& data) {
    std::uint64_t total = 1;
    for (std::uint64_t d : dims) total *= d;
    if (total != data.size()) throw ContractViolation("write_tensor_file: dims/data mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ContractViolation("write_tensor_file: cannot open " + path.string());
    f.write("ENR1", 4);
    write_u64(f, dims.size());
    for (std::uint64_t d : dims) write_u64(f, d);
    for (double x : data) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        write_u64(f, bits);
    }
}

TensorFile read_tensor_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ContractViolation("read_tensor_file: cannot open " + path.string());
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "ENR1", 4) != 0)
        throw ContractViolation("read_tensor_file: bad magic");
    TensorFile out;
    const std::uint64_t rank = read_u64(f);
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < rank; ++i) {
        out.dims.push_back(read_u64(f));
        total *= out.dims.back();
    }
    out.data.resize(total);
    for (std::uint64_t i = 0; i < total; ++i) {
        const std::uint64_t bits = read_u64(f);
        std::memcpy(&out.data[i], &bits, 8);
    }
    if (!f) throw ContractViolation("read_tensor_file: truncated file");
    return out;
}

}  // namespace enrnn
