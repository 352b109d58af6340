import { App } from "./app.js";
import { ServiceClient } from "./api.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "http://127.0.0.1:8000";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

void new App(root, new ServiceClient(base)).start();
