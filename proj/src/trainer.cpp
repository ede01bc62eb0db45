#include "thermadet/trainer.hpp"

#include <fstream>
#include <iomanip>

namespace thermadet::train {

void write_train_log(const std::filesystem::path& path, const TrainLog& log, bool wall_time) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("train log: cannot open for writing: " + path.string());
    f << "epoch,train_loss,val_loss,seconds,best\n";
    f << std::setprecision(10);
    for (const auto& e : log.epochs) {
        f << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',';
        if (wall_time)
            f << std::fixed << std::setprecision(3) << e.seconds << std::defaultfloat << std::setprecision(10);
        else
            f << 0;
        f << ',' << (e.is_best ? 1 : 0) << "\n";
    }
    if (!f) throw std::runtime_error("train log: write failed: " + path.string());
}

}  // namespace thermadet::train
