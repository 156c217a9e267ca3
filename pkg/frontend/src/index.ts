export * from "./types.js";
export * from "./api.js";
export * from "./graphView.js";
export * from "./state.js";
