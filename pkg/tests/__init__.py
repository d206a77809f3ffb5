# Este arquivo transforma o diretório tests em um pacote Python
