#pragma once

#include "lbm/full_lattice.hpp"
#include "lbm/kernels.hpp"

namespace lbm::detail {

std::unique_ptr<Kernel> make_full_os(KernelDescriptor d, const FlagField& ff,
                                     WorkerPool& pool, int row_pad);
std::unique_ptr<Kernel> make_full_aa(KernelDescriptor d, const FlagField& ff,
                                     WorkerPool& pool, int row_pad);
std::unique_ptr<Kernel> make_list_os(KernelDescriptor d, const FlagField& ff,
                                     const PaddingPolicy& padding,
                                     WorkerPool& pool);
std::unique_ptr<Kernel> make_list_nt(KernelDescriptor d, const FlagField& ff,
                                     const PaddingPolicy& padding,
                                     WorkerPool& pool);
std::unique_ptr<Kernel> make_list_aa(KernelDescriptor d, const FlagField& ff,
                                     const PaddingPolicy& padding,
                                     WorkerPool& pool);

}  // namespace lbm::detail
