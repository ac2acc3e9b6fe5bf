#pragma once

#include "tranet/adam.hpp"
#include "tranet/datasets.hpp"
#include "tranet/encoding.hpp"
#include "tranet/error.hpp"
#include "tranet/fpenv.hpp"
#include "tranet/gradcheck.hpp"
#include "tranet/harness.hpp"
#include "tranet/io.hpp"
#include "tranet/model.hpp"
#include "tranet/nn.hpp"
#include "tranet/numword.hpp"
#include "tranet/plot.hpp"
#include "tranet/report.hpp"
#include "tranet/rng.hpp"
#include "tranet/tensor.hpp"
