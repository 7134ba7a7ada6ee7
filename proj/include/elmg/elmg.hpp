#pragma once

#include "errors.hpp"
#include "graph.hpp"
#include "model.hpp"
#include "model_io.hpp"
#include "spectral.hpp"
#include "data_io.hpp"
#include "experiment.hpp"
