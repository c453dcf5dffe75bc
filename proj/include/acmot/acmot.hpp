#pragma once

#include "acmot/types.hpp"
#include "acmot/ac_graph.hpp"
#include "acmot/affinity.hpp"
#include "acmot/assignment.hpp"
#include "acmot/optimizer.hpp"
#include "acmot/io_mot.hpp"
#include "acmot/metrics.hpp"
#include "acmot/synth.hpp"
#include "acmot/config.hpp"
