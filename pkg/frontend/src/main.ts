import { mount } from "./app.js";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app element");
mount(root);
