// Homogeneous numeric table with named columns; the unit is part of each column name.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bilattice {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size()) {
            throw std::logic_error("table row has " + std::to_string(row.size()) +
                                   " values for " + std::to_string(columns.size()) + " columns");
        }
        rows.push_back(std::move(row));
    }

    [[nodiscard]] std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return i;
        }
        throw std::out_of_range("no column named " + name);
    }
};

}  // namespace bilattice
